def merge(intervals):
    if len(intervals) == 0:
        return []
    ordered = sorted(intervals)
    merged = [ordered[0]]
    for pair in ordered[1:]:
        last = merged[-1]
        if pair[0] <= last[1]:
            end = max(last[1], pair[1])
            merged[-1] = (last[0], end)
        else:
            merged.append(pair)
    return merged


def covered(intervals):
    total = 0
    for start, end in merge(intervals):
        total += end - start
    return total


def gaps(intervals):
    out = []
    blocks = merge(intervals)
    for i in range(1, len(blocks)):
        out.append((blocks[i - 1][1], blocks[i][0]))
    return out
