assert fizzbuzz(0) == []
assert fizzbuzz(1) == ["1"]
assert fizzbuzz(5) == ["1", "2", "Fizz", "4", "Buzz"]
assert fizzbuzz(15)[14] == "FizzBuzz"
assert fizzbuzz(15)[8] == "Fizz"
assert fizzbuzz(15)[9] == "Buzz"
assert len(fizzbuzz(30)) == 30
assert label(30) == "FizzBuzz"
assert label(7) == "7"
assert count_kinds(15) == {"Fizz": 4, "Buzz": 2, "FizzBuzz": 1, "number": 8}
assert count_kinds(2) == {"Fizz": 0, "Buzz": 0, "FizzBuzz": 0, "number": 2}
