assert gcd(12, 18) == 6
assert gcd(17, 5) == 1
assert gcd(0, 9) == 9
assert gcd(-8, 12) == 4
assert lcm(4, 6) == 12
assert lcm(0, 5) == 0
assert lcm(7, 3) == 21
assert lcm_all([]) == 1
assert lcm_all([2, 3, 4]) == 12
assert lcm_all([5]) == 5
assert digit_sum(0) == 0
assert digit_sum(9) == 9
assert digit_sum(1234) == 10
assert digit_sum(1000) == 1
