assert transpose([]) == []
assert transpose([[1, 2, 3]]) == [[1], [2], [3]]
assert transpose([[1, 2], [3, 4], [5, 6]]) == [[1, 3, 5], [2, 4, 6]]
assert multiply([[1, 2], [3, 4]], [[5, 6], [7, 8]]) == [[19, 22], [43, 50]]
assert multiply([[2, 0, 1]], [[1], [2], [3]]) == [[5]]
assert multiply([[1, 0], [0, 1]], [[9, 8], [7, 6]]) == [[9, 8], [7, 6]]
assert trace([[1, 2], [3, 4]]) == 5
assert trace([[7]]) == 7
assert trace([[1, 0, 0], [0, 2, 0], [0, 0, 3]]) == 6
assert trace([]) == 0
