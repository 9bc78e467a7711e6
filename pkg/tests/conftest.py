import pytest

from nicheck import gallery


@pytest.fixture
def leak_causal():
    return gallery.leak_causal()


@pytest.fixture
def high_after_low():
    return gallery.high_after_low()


@pytest.fixture
def twin_pumps():
    return gallery.twin_pumps()


@pytest.fixture
def shared_token():
    return gallery.shared_token()


@pytest.fixture
def causal_pair():
    return gallery.causal_pair()


@pytest.fixture
def late_leak():
    return gallery.late_leak()


@pytest.fixture
def shop():
    return gallery.shop()


@pytest.fixture
def shop_bounded():
    return gallery.shop_bounded(2)


@pytest.fixture
def rings():
    return gallery.rings()


@pytest.fixture
def shop_leaky():
    return gallery.shop_leaky()
