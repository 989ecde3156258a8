def encode(s):
    runs = []
    if s == "":
        return runs
    current = s[0]
    count = 1
    for ch in s[1:]:
        if ch == current:
            count += 1
        else:
            runs.append((current, count))
            current = ch
            count = 1
    runs.append((current, count))
    return runs


def decode(runs):
    parts = []
    for ch, count in runs:
        parts.append(ch * count)
    return "".join(parts)


def compress_ratio(s):
    if len(s) == 0:
        return 100
    size = len(encode(s)) * 2
    return size * 100 // len(s)
