def primes_upto(n):
    if n < 2:
        return []
    flags = [True] * (n + 1)
    flags[0] = False
    flags[1] = False
    p = 2
    while p * p <= n:
        if flags[p]:
            for m in range(p * p, n + 1, p):
                flags[m] = False
        p += 1
    result = []
    for i in range(n + 1):
        if flags[i]:
            result.append(i)
    return result


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def nth_prime(k):
    limit = 16
    while len(primes_upto(limit)) < k:
        limit = limit * 2
    return primes_upto(limit)[k - 1]
