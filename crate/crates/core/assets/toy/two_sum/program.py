def two_sum(xs, target):
    seen = {}
    for j in range(len(xs)):
        need = target - xs[j]
        if need in seen:
            return (seen[need], j)
        if xs[j] not in seen:
            seen[xs[j]] = j
    return None


def pair_count(xs, target):
    count = 0
    n = len(xs)
    for i in range(n):
        for j in range(i + 1, n):
            if xs[i] + xs[j] == target:
                count += 1
    return count


def has_pair(xs, target):
    return two_sum(xs, target) is not None
