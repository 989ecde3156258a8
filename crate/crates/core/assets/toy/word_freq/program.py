def clean(word):
    out = ""
    for ch in word.lower():
        if ch not in ".,!?":
            out += ch
    return out


def word_counts(text):
    counts = {}
    for raw in text.split():
        word = clean(raw)
        if word == "":
            continue
        counts[word] = counts.get(word, 0) + 1
    return counts


def top_words(text, n):
    counts = word_counts(text)
    pairs = []
    for word, count in counts.items():
        pairs.append((-count, word))
    pairs.sort()
    result = []
    for neg, word in pairs[:n]:
        result.append((word, -neg))
    return result
