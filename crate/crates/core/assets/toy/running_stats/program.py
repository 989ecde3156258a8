def running_stats(xs):
    prefix_max = []
    prefix_min = []
    total = 0
    if len(xs) == 0:
        return (prefix_max, prefix_min, total)
    best = xs[0]
    worst = xs[0]
    for x in xs:
        if x > best:
            best = x
        if x < worst:
            worst = x
        prefix_max.append(best)
        prefix_min.append(worst)
        total += x
    return (prefix_max, prefix_min, total)


def spread(xs):
    if len(xs) == 0:
        return 0
    stats = running_stats(xs)
    highs = stats[0]
    lows = stats[1]
    last = len(xs) - 1
    return highs[last] - lows[last]
