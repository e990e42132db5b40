import pathlib

import pytest

GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"


class Golden:
    """Compare text against a stored golden file; regenerate with
    `pytest --update-golden`."""

    def __init__(self, update):
        self.update = update

    def check(self, name, text):
        path = GOLDEN_DIR / name
        if self.update or not path.exists():
            GOLDEN_DIR.mkdir(exist_ok=True)
            path.write_text(text)
            if self.update:
                pytest.skip(f"updated golden file {name}")
        assert text == path.read_text(), f"golden mismatch for {name}"


def pytest_addoption(parser):
    parser.addoption("--update-golden", action="store_true", default=False)


@pytest.fixture
def golden(request):
    return Golden(request.config.getoption("--update-golden"))
