VALUES = [1000, 900, 500, 400, 100, 90, 50, 40, 10, 9, 5, 4, 1]
SYMBOLS = ["M", "CM", "D", "CD", "C", "XC", "L", "XL", "X", "IX", "V", "IV", "I"]


def to_roman(n):
    out = ""
    i = 0
    while n > 0:
        while n >= VALUES[i]:
            out += SYMBOLS[i]
            n -= VALUES[i]
        i += 1
    return out


def from_roman(s):
    single = {"I": 1, "V": 5, "X": 10, "L": 50, "C": 100, "D": 500, "M": 1000}
    total = 0
    for i in range(len(s)):
        value = single[s[i]]
        if i + 1 < len(s) and single[s[i + 1]] > value:
            total -= value
        else:
            total += value
    return total
