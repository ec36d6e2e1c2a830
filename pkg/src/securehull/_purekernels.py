"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``."""

BACKEND = "python"


def powmod(base, exponent, modulus):
    if base < 0 or exponent < 0 or modulus < 0:
        raise ValueError("kernel operands must be non-negative")
    return pow(base, exponent, modulus)


def powmod_many(bases, exponents, modulus):
    return [powmod(b, e, modulus) for b, e in zip(bases, exponents)]


class FixedBaseTable:
    def __init__(self, base, modulus, bits, window=6):
        self.bits = bits
        self.window = window
        self.mod = modulus
        width = 1 << window
        windows = (bits + window - 1) // window
        self._rows = []
        step = base % modulus
        for _ in range(windows):
            row = [1]
            for _ in range(1, width):
                row.append(row[-1] * step % modulus)
            self._rows.append(row)
            step = row[-1] * step % modulus

    def pow(self, exponent):
        if exponent < 0 or exponent.bit_length() > self.bits:
            raise ValueError("exponent outside table range")
        mask = (1 << self.window) - 1
        acc = 1
        k = 0
        while exponent:
            d = exponent & mask
            if d:
                acc = acc * self._rows[k][d] % self.mod
            exponent >>= self.window
            k += 1
        return acc
