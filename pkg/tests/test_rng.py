"""Tests for seeded random streams."""

import numpy as np
import pytest

from twlab.errors import InvalidConfig
from twlab.rng import as_generator, derive_seed, label_key, stream


class TestStream:
    def test_reproducible(self):
        np.testing.assert_array_equal(stream(3, 'session', 1, 2).random(5),
                                      stream(3, 'session', 1, 2).random(5))

    def test_independent_purposes(self):
        draws = [stream(3, 'session', 1, 2).random(),
                 stream(3, 'session', 2, 1).random(),
                 stream(3, 'editorial', 1, 2).random(),
                 stream(4, 'session', 1, 2).random()]
        assert len(set(draws)) == 4

    def test_label_key_is_stable(self):
        assert label_key('session') == label_key('session')
        assert label_key('session') != label_key('editorial')

    def test_derive_seed(self):
        seed = derive_seed(0, 'run', 1)
        assert seed == derive_seed(0, 'run', 1)
        assert seed != derive_seed(0, 'run', 2)
        assert 0 <= seed < 2 ** 32

    def test_as_generator(self):
        rng = np.random.default_rng(0)
        assert as_generator(rng, 'x') is rng
        assert as_generator(5, 'x').random() == stream(5, 'x').random()

    @pytest.mark.parametrize("seed,indices", [(-1, ()), (1.5, ()),
                                              (True, ()), (0, (-2,))])
    def test_invalid(self, seed, indices):
        with pytest.raises(InvalidConfig):
            stream(seed, 'session', *indices)
