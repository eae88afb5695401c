"""
Published reference values for the number of minimal balanced collections

Version 1 of the embedded tables. TOTALS and BY_SIZE reproduce the published
tables of totals and of counts by collection size; TWO_ELEMENT is the published
column of collections made only of 2-element sets.
"""

from typing import Dict, Tuple

GOLDEN_VERSION = 1

# B_n, total number of minimal balanced collections on [n]
TOTALS: Dict[int, int] = {
    1: 1,
    2: 2,
    3: 6,
    4: 42,
    5: 1292,
    6: 200214,
    7: 132422036,
}

# B_{n,m} for m = 1..n
BY_SIZE: Dict[int, Tuple[int, ...]] = {
    1: (1,),
    2: (1, 1),
    3: (1, 3, 2),
    4: (1, 7, 12, 22),
    5: (1, 15, 50, 250, 976),
    6: (1, 31, 180, 1910, 18780, 179312),
}

# Collections whose members all have two elements, as published
TWO_ELEMENT_PUBLISHED: Dict[int, int] = {
    3: 1,
    4: 3,
    5: 22,
    6: 25,
    7: 712,
}

# Values derived from the component decomposition (edges and odd cycles).
# n = 7 decomposes as 360 (7-cycles) + 252 (5-cycle and edge) + 105 (triangle and two edges);
# the published 712 is kept above and flagged as an erratum.
TWO_ELEMENT: Dict[int, int] = {
    2: 1,
    3: 1,
    4: 3,
    5: 22,
    6: 25,
    7: 717,
}

TWO_ELEMENT_ERRATA = frozenset(n for n in TWO_ELEMENT_PUBLISHED if TWO_ELEMENT_PUBLISHED[n] != TWO_ELEMENT[n])
