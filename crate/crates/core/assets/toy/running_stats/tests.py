assert running_stats([]) == ([], [], 0)
assert running_stats([5]) == ([5], [5], 5)
assert running_stats([3, 1, 4, 1, 5]) == ([3, 3, 4, 4, 5], [3, 1, 1, 1, 1], 14)
assert running_stats([-2, -7, 0]) == ([-2, -2, 0], [-2, -7, -7], -9)
assert running_stats([2, 2, 2]) == ([2, 2, 2], [2, 2, 2], 6)
assert spread([]) == 0
assert spread([4, 9, 1]) == 8
assert spread([7]) == 0
assert spread([-3, 3]) == 6
