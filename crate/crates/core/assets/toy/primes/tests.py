assert primes_upto(1) == []
assert primes_upto(2) == [2]
assert primes_upto(10) == [2, 3, 5, 7]
assert primes_upto(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
assert len(primes_upto(100)) == 25
assert primes_upto(49)[-1] == 47
assert is_prime(2)
assert is_prime(97)
assert not is_prime(1)
assert not is_prime(91)
assert not is_prime(49)
assert nth_prime(1) == 2
assert nth_prime(5) == 11
assert nth_prime(25) == 97
