assert balanced("")
assert balanced("()[]{}")
assert balanced("a(b[c]{d}e)f")
assert not balanced("(")
assert not balanced(")(")
assert not balanced("([)]")
assert not balanced("]")
assert not balanced("((")
assert max_depth("") == 0
assert max_depth("(())") == 2
assert max_depth("()[{()}]") == 3
assert max_depth("(]") == -1
assert max_depth("x") == 0
