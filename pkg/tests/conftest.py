import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")


@pytest.fixture
def mp128():
    from pertseries.numeric import make_context

    return make_context(128)
