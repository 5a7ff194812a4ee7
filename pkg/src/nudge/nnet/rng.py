"""splitmix64 PRNG.

Chosen because the recipe is a handful of integer ops and therefore easy to
reproduce exactly in any language, which keeps weight initialisation and
shuffling portable across implementations.

Recipe: state starts at the seed (mod 2^64). Each draw adds the constant
0x9E3779B97F4A7C15, then mixes with two xor-shift-multiply rounds.
`uniform()` maps the top 53 bits to [0, 1).
"""

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def below(self, bound: int) -> int:
        """Uniform int in [0, bound) via modulo (bias negligible at our sizes)."""
        return self.next_u64() % bound

    def shuffle(self, items) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
