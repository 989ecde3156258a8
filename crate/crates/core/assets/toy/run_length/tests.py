assert encode("") == []
assert encode("a") == [("a", 1)]
assert encode("aaabcc") == [("a", 3), ("b", 1), ("c", 2)]
assert encode("abab") == [("a", 1), ("b", 1), ("a", 1), ("b", 1)]
assert decode([]) == ""
assert decode([("x", 2), ("y", 3)]) == "xxyyy"
assert decode(encode("zzzzqz")) == "zzzzqz"
assert compress_ratio("") == 100
assert compress_ratio("aaaaaaaaaa") == 20
assert compress_ratio("ab") == 200
assert compress_ratio("aabbb") == 80
