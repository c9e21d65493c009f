import mpmath
import pytest

from primelab.util import DomainError, PoleError
from primelab.zetafn import zeta


@pytest.mark.parametrize(
    "s",
    [
        2.0,
        3.0,
        4.0,
        1.5,
        0.5,
        0.25,
        complex(0.8, 0.3),
        complex(0.5, 14.134),
        complex(0.5, 50.0),
        complex(1.2, 80.0),
        complex(2.5, 30.0),
        complex(5.0, 5.0),
        1.0 + 1e-7,
        1.0 - 1e-7,
    ],
)
def test_zeta_against_mpmath(s):
    ours = zeta(s)
    ref = complex(mpmath.zeta(s))
    assert abs(ours - ref) <= 1e-9 * max(abs(ref), 1.0)


def test_zeta_pole_and_domain():
    with pytest.raises(PoleError):
        zeta(1.0)
    with pytest.raises(DomainError):
        zeta(-0.5)
