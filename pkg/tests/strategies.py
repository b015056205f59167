"""Hypothesis strategies shared by the property tests."""

import numpy as np
from hypothesis import strategies as st

from abssep.spectra import SystemDims, make_spectrum

SMALL_DIMS = [SystemDims(2, 2), SystemDims(2, 3), SystemDims(3, 3), SystemDims(2, 4), SystemDims(3, 4)]


def weights(n, min_value=0.0):
    return st.lists(st.floats(min_value=min_value, max_value=1.0, allow_nan=False),
                    min_size=n, max_size=n).filter(lambda w: sum(w) > 1e-3)


@st.composite
def spectra(draw, dims_choices=SMALL_DIMS, min_value=0.0):
    dims = draw(st.sampled_from(dims_choices))
    w = draw(weights(dims.total, min_value))
    arr = np.array(w)
    return make_spectrum(arr / arr.sum(), dims)


@st.composite
def seeds(draw):
    return draw(st.integers(min_value=0, max_value=2**32 - 1))
