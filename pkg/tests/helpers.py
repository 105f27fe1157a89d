"""Random inputs shared across test modules."""


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_hermitian(rng, n, scale=1.0):
    A = random_complex(rng, n)
    return scale * (A + A.conj().T) / 2
