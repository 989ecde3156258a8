def gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b != 0:
        r = a % b
        a = b
        b = r
    return a


def lcm(a, b):
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)


def lcm_all(xs):
    acc = 1
    for x in xs:
        acc = lcm(acc, x)
    return acc


def digit_sum(n):
    total = 0
    while n > 0:
        total += n % 10
        n = n // 10
    return total
