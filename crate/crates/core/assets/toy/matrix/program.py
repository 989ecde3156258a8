def transpose(m):
    if len(m) == 0:
        return []
    rows = len(m)
    cols = len(m[0])
    out = []
    for j in range(cols):
        row = []
        for i in range(rows):
            row.append(m[i][j])
        out.append(row)
    return out


def multiply(a, b):
    bt = transpose(b)
    out = []
    for row in a:
        new_row = []
        for col in bt:
            acc = 0
            for k in range(len(row)):
                acc += row[k] * col[k]
            new_row.append(acc)
        out.append(new_row)
    return out


def trace(m):
    total = 0
    for i in range(len(m)):
        total += m[i][i]
    return total
