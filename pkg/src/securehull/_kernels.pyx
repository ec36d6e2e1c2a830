# cython: language_level=3, boundscheck=False, wraparound=False
"""GMP-backed modular arithmetic for the Paillier layer.

Python ints cross the boundary through little-endian byte buffers; every
operand must be non-negative.
"""

from libc.stdlib cimport malloc, free
from cpython.bytes cimport PyBytes_FromStringAndSize, PyBytes_AS_STRING


cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    ctypedef __mpz_struct* mpz_ptr

    void mpz_init(mpz_t)
    void mpz_clear(mpz_t)
    void mpz_set(mpz_t, mpz_t)
    void mpz_set_ui(mpz_t, unsigned long)
    void mpz_mul(mpz_t, mpz_t, mpz_t)
    void mpz_mod(mpz_t, mpz_t, mpz_t)
    void mpz_powm(mpz_t, mpz_t, mpz_t, mpz_t)
    size_t mpz_sizeinbase(mpz_t, int)
    void mpz_import(mpz_t, size_t, int, size_t, int, size_t, const void *)
    void *mpz_export(void *, size_t *, int, size_t, int, size_t, mpz_t)


BACKEND = "gmp"


cdef int _load(mpz_t z, object value) except -1:
    if value < 0:
        raise ValueError("kernel operands must be non-negative")
    cdef bytes buf = value.to_bytes((value.bit_length() + 7) // 8 or 1, "little")
    mpz_import(z, len(buf), -1, 1, 0, 0, PyBytes_AS_STRING(buf))
    return 0


cdef object _dump(mpz_t z):
    cdef size_t count = (mpz_sizeinbase(z, 2) + 7) // 8
    cdef char *out = <char *> malloc(count + 1)
    if out == NULL:
        raise MemoryError()
    cdef size_t written = 0
    try:
        mpz_export(out, &written, -1, 1, 0, 0, z)
        return int.from_bytes(PyBytes_FromStringAndSize(out, written), "little")
    finally:
        free(out)


def powmod(base, exponent, modulus):
    cdef mpz_t b, e, m, r
    mpz_init(b); mpz_init(e); mpz_init(m); mpz_init(r)
    try:
        _load(b, base)
        _load(e, exponent)
        _load(m, modulus)
        mpz_powm(r, b, e, m)
        return _dump(r)
    finally:
        mpz_clear(b); mpz_clear(e); mpz_clear(m); mpz_clear(r)


def powmod_many(bases, exponents, modulus):
    """Element-wise ``base ** exponent % modulus``; one modulus load for the batch."""
    cdef mpz_t b, e, m, r
    out = []
    mpz_init(b); mpz_init(e); mpz_init(m); mpz_init(r)
    try:
        _load(m, modulus)
        for base, exponent in zip(bases, exponents):
            _load(b, base)
            _load(e, exponent)
            mpz_powm(r, b, e, m)
            out.append(_dump(r))
        return out
    finally:
        mpz_clear(b); mpz_clear(e); mpz_clear(m); mpz_clear(r)


cdef class FixedBaseTable:
    """Windowed table of ``base ** (d << (w * k)) % modulus``.

    Exponentiation with an exponent below ``2 ** bits`` costs one modular
    multiplication per non-zero window and no squarings.
    """

    cdef mpz_t *entries
    cdef mpz_t mod
    cdef readonly int bits
    cdef readonly int window
    cdef int windows
    cdef int width

    def __cinit__(self, base, modulus, int bits, int window=6):
        cdef int k, d, idx
        self.entries = NULL
        self.bits = bits
        self.window = window
        self.windows = (bits + window - 1) // window
        self.width = 1 << window
        mpz_init(self.mod)
        _load(self.mod, modulus)
        self.entries = <mpz_t *> malloc(self.windows * self.width * sizeof(mpz_t))
        if self.entries == NULL:
            raise MemoryError()
        for idx in range(self.windows * self.width):
            mpz_init(self.entries[idx])
        cdef mpz_t step
        mpz_init(step)
        _load(step, base % modulus)
        for k in range(self.windows):
            idx = k * self.width
            mpz_set_ui(self.entries[idx], 1)
            for d in range(1, self.width):
                mpz_mul(self.entries[idx + d], self.entries[idx + d - 1], step)
                mpz_mod(self.entries[idx + d], self.entries[idx + d], self.mod)
            # next window base: step ** width
            mpz_mul(step, self.entries[idx + self.width - 1], step)
            mpz_mod(step, step, self.mod)
        mpz_clear(step)

    def __dealloc__(self):
        cdef int idx
        if self.entries != NULL:
            for idx in range(self.windows * self.width):
                mpz_clear(self.entries[idx])
            free(self.entries)
        mpz_clear(self.mod)

    def pow(self, exponent):
        if exponent < 0 or exponent.bit_length() > self.bits:
            raise ValueError("exponent outside table range")
        cdef mpz_t acc
        cdef int k, d
        cdef unsigned long mask = self.width - 1
        mpz_init(acc)
        mpz_set_ui(acc, 1)
        try:
            k = 0
            while exponent:
                d = exponent & mask
                if d:
                    mpz_mul(acc, acc, self.entries[k * self.width + d])
                    mpz_mod(acc, acc, self.mod)
                exponent >>= self.window
                k += 1
            return _dump(acc)
        finally:
            mpz_clear(acc)
