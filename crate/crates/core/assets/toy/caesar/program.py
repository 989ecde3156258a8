ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def shift_char(ch, k):
    lower = ch.lower()
    if lower not in ALPHABET:
        return ch
    i = ALPHABET.index(lower)
    moved = ALPHABET[(i + k) % 26]
    if ch != lower:
        return moved.upper()
    return moved


def encode(text, k):
    out = []
    for ch in text:
        out.append(shift_char(ch, k))
    return "".join(out)


def decode(text, k):
    return encode(text, -k)


def letter_count(text):
    n = 0
    for ch in text.lower():
        if ch in ALPHABET:
            n += 1
    return n
