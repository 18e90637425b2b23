"""Writes the bundled code files (bivariate bicycle and simplex hypergraph-product codes)."""
import numpy as np


def write(path, name, hx, hz, d, layout):
    n = hx.shape[1]
    k = n - rank(hx) - rank(hz)
    with open(path, "w") as f:
        f.write(f"{n} {k} {d} {name}\n")
        for tag, m in (("HX", hx), ("HZ", hz)):
            f.write(f"{tag}\n")
            for row in m:
                f.write(" ".join(str(int(b)) for b in row) + "\n")
        f.write("LAYOUT\n")
        for x, y in layout:
            f.write(f"{x} {y}\n")
    print(path, n, k, d)


def rank(m):
    m = m.copy() % 2
    r = 0
    for c in range(m.shape[1]):
        piv = next((i for i in range(r, m.shape[0]) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(m.shape[0]):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    return r


def shift(n, p):
    return np.roll(np.eye(n, dtype=np.uint8), p, axis=1)


def bivariate_bicycle(l, m, a_terms, b_terms):
    x = np.kron(shift(l, 1), np.eye(m, dtype=np.uint8))
    y = np.kron(np.eye(l, dtype=np.uint8), shift(m, 1))

    def poly(terms):
        acc = np.zeros((l * m, l * m), dtype=np.uint8)
        for var, p in terms:
            acc ^= np.linalg.matrix_power(x if var == "x" else y, p) % 2
        return acc

    a, b = poly(a_terms), poly(b_terms)
    hx = np.hstack([a, b])
    hz = np.hstack([b.T, a.T])
    # left block at even sites, right block at odd sites of a 2l x 2m torus
    layout = [(2 * i, 2 * j) for i in range(l) for j in range(m)]
    layout += [(2 * i + 1, 2 * j + 1) for i in range(l) for j in range(m)]
    return hx, hz, layout


def hypergraph_product(h1, h2):
    r1, n1 = h1.shape
    r2, n2 = h2.shape
    hx = np.hstack([np.kron(h1, np.eye(n2, dtype=np.uint8)), np.kron(np.eye(r1, dtype=np.uint8), h2.T)]) % 2
    hz = np.hstack([np.kron(np.eye(n1, dtype=np.uint8), h2), np.kron(h1.T, np.eye(r2, dtype=np.uint8))]) % 2
    layout = [(2 * a, 2 * b) for a in range(n1) for b in range(n2)]
    layout += [(2 * i + 1, 2 * j + 1) for i in range(r1) for j in range(r2)]
    return hx, hz, layout


def circulant(n, support):
    row = np.zeros(n, dtype=np.uint8)
    row[list(support)] = 1
    return np.array([np.roll(row, s) for s in range(n)], dtype=np.uint8)


terms = ([("x", 3), ("y", 1), ("y", 2)], [("y", 3), ("x", 1), ("x", 2)])
for name, l, d in (("bb72", 6, 6), ("bb144", 12, 12)):
    hx, hz, lay = bivariate_bicycle(l, 6, *terms)
    write(f"{name}.code", name, hx, hz, d, lay)
# cyclic simplex codes: circulant checks from the Hamming generator polynomials
for name, n, support, d in (("simplex98", 7, [0, 1, 3], 4), ("simplex450", 15, [0, 1, 4], 8)):
    h = circulant(n, support)
    hx, hz, lay = hypergraph_product(h, h)
    write(f"{name}.code", name, hx, hz, d, lay)
