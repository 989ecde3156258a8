PAIRS = {")": "(", "]": "[", "}": "{"}


def balanced(s):
    stack = []
    for ch in s:
        if ch in "([{":
            stack.append(ch)
        elif ch in PAIRS:
            if len(stack) == 0:
                return False
            top = stack.pop()
            if top != PAIRS[ch]:
                return False
    return len(stack) == 0


def max_depth(s):
    if not balanced(s):
        return -1
    depth = 0
    best = 0
    for ch in s:
        if ch in "([{":
            depth += 1
            if depth > best:
                best = depth
        elif ch in PAIRS:
            depth -= 1
    return best
