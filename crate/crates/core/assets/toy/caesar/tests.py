assert shift_char("a", 1) == "b"
assert shift_char("z", 1) == "a"
assert shift_char("A", 2) == "C"
assert shift_char("!", 5) == "!"
assert encode("abc xyz", 3) == "def abc"
assert encode("Hello, World", 13) == "Uryyb, Jbeyq"
assert encode("", 4) == ""
assert decode("def abc", 3) == "abc xyz"
assert decode(encode("Round Trip 42", 7), 7) == "Round Trip 42"
assert encode("a", 27) == "b"
assert letter_count("ab1 C!") == 3
assert letter_count("") == 0
