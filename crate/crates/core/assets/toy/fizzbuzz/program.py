def label(i):
    if i % 15 == 0:
        return "FizzBuzz"
    if i % 3 == 0:
        return "Fizz"
    if i % 5 == 0:
        return "Buzz"
    return str(i)


def fizzbuzz(n):
    out = []
    i = 1
    while i <= n:
        out.append(label(i))
        i += 1
    return out


def count_kinds(n):
    kinds = {"Fizz": 0, "Buzz": 0, "FizzBuzz": 0, "number": 0}
    for item in fizzbuzz(n):
        if item in kinds:
            kinds[item] += 1
        else:
            kinds["number"] += 1
    return kinds
