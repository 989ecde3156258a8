assert merge([]) == []
assert merge([(1, 3)]) == [(1, 3)]
assert merge([(1, 3), (2, 6), (8, 10)]) == [(1, 6), (8, 10)]
assert merge([(5, 7), (1, 2)]) == [(1, 2), (5, 7)]
assert merge([(1, 3), (3, 5)]) == [(1, 5)]
assert merge([(1, 10), (2, 3)]) == [(1, 10)]
assert covered([(1, 3), (2, 6), (8, 10)]) == 7
assert covered([]) == 0
assert gaps([(1, 3), (5, 6), (9, 12)]) == [(3, 5), (6, 9)]
assert gaps([(1, 4), (2, 5)]) == []
