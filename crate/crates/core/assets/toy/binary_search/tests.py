data = [1, 3, 3, 5, 8, 13]
assert lower_bound(data, 0) == 0
assert lower_bound(data, 1) == 0
assert lower_bound(data, 3) == 1
assert lower_bound(data, 4) == 3
assert lower_bound(data, 13) == 5
assert lower_bound(data, 14) == 6
assert lower_bound([], 5) == 0
assert count_in_range(data, 3, 8) == 3
assert count_in_range(data, 0, 100) == 6
assert count_in_range(data, 5, 5) == 0
assert count_in_range(data, 9, 2) == 0
assert contains(data, 5)
assert not contains(data, 4)
assert not contains(data, 20)
assert contains(data, 1)
