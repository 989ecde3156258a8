assert two_sum([2, 7, 11, 15], 9) == (0, 1)
assert two_sum([3, 2, 4], 6) == (1, 2)
assert two_sum([3, 3], 6) == (0, 1)
assert two_sum([1, 2, 3], 100) is None
assert two_sum([], 1) is None
assert two_sum([5, 1, 5, 5], 10) == (0, 2)
assert pair_count([1, 1, 1], 2) == 3
assert pair_count([1, 2, 3, 4], 5) == 2
assert pair_count([], 0) == 0
assert pair_count([4], 8) == 0
assert has_pair([0, -1, 1], 0)
assert not has_pair([1, 2], 5)
