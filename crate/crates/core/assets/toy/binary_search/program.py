def lower_bound(xs, target):
    lo = 0
    hi = len(xs)
    while lo < hi:
        mid = (lo + hi) // 2
        if xs[mid] < target:
            lo = mid + 1
        else:
            hi = mid
    return lo


def count_in_range(xs, lo, hi):
    if hi <= lo:
        return 0
    start = lower_bound(xs, lo)
    stop = lower_bound(xs, hi)
    return stop - start


def contains(xs, target):
    i = lower_bound(xs, target)
    if i == len(xs):
        return False
    return xs[i] == target
