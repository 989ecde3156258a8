assert clean("Hello!") == "hello"
assert clean("...") == ""
assert word_counts("a b A, b! c") == {"a": 2, "b": 2, "c": 1}
assert word_counts("") == {}
assert word_counts("? !") == {}
assert top_words("the cat and the hat and the bat", 2) == [("the", 3), ("and", 2)]
assert top_words("b a c", 2) == [("a", 1), ("b", 1)]
assert top_words("x", 5) == [("x", 1)]
assert top_words("Dog dog DOG cat", 1) == [("dog", 3)]
assert top_words("one two two", 0) == []
