s = {"apple": 5}
r = apply_orders(s, [("add", "pear", 3), ("remove", "apple", 2)])
assert r == []
assert s == {"apple": 3, "pear": 3}
r = apply_orders(s, [("remove", "pear", 4), ("remove", "pear", 3)])
assert r == [("remove", "pear", 4)]
assert s == {"apple": 3}
r = apply_orders(s, [("sell", "apple", 1), ("remove", "kiwi", 1)])
assert r == [("sell", "apple", 1), ("remove", "kiwi", 1)]
assert s == {"apple": 3}
assert low_stock({"b": 1, "a": 2, "c": 9}, 5) == ["a", "b"]
assert low_stock({"a": 5}, 5) == []
assert low_stock({}, 3) == []
assert total_units({"a": 2, "b": 7}) == 9
assert total_units({}) == 0
