def apply_orders(stock, orders):
    refused = []
    for kind, item, qty in orders:
        have = stock.get(item, 0)
        if kind == "add":
            stock[item] = have + qty
        elif kind == "remove":
            if qty > have:
                refused.append((kind, item, qty))
                continue
            stock[item] = have - qty
            if stock[item] == 0:
                stock.pop(item)
        else:
            refused.append((kind, item, qty))
    return refused


def low_stock(stock, threshold):
    names = []
    for item, qty in stock.items():
        if qty < threshold:
            names.append(item)
    names.sort()
    return names


def total_units(stock):
    return sum(stock.values())
