assert to_roman(1) == "I"
assert to_roman(4) == "IV"
assert to_roman(9) == "IX"
assert to_roman(14) == "XIV"
assert to_roman(40) == "XL"
assert to_roman(1994) == "MCMXCIV"
assert to_roman(3999) == "MMMCMXCIX"
assert from_roman("III") == 3
assert from_roman("IX") == 9
assert from_roman("LVIII") == 58
assert from_roman("MCMXCIV") == 1994
for n in [1, 2, 4, 5, 49, 444, 2024]:
    assert from_roman(to_roman(n)) == n
