import pytest

from decotrace import DoubleGaussian, MomentumGrid, tabulate


@pytest.fixture
def unit_grid():
    return MomentumGrid.symmetric(5.0, 32)


def gaussian_state(ratio, n_points=32, sigma_p=1.0, extent=5.0):
    """Tabulated double Gaussian with sigma_p / sigma_c = ratio on a shared grid."""
    f = DoubleGaussian(sigma_p, sigma_p / ratio)
    grid = MomentumGrid.symmetric(extent * f.max_width, n_points)
    return tabulate(f, grid, grid)
