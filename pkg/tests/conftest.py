import json
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def fixture_api_dir() -> Path:
    return FIXTURES / "api"


@pytest.fixture(scope="session")
def rejection_corpus() -> list[tuple[str, str]]:
    path = FIXTURES / "rejections" / "corpus.jsonl"
    return [
        (obj["text"], obj["expected"])
        for obj in map(json.loads, path.read_text(encoding="utf-8").splitlines())
    ]


@pytest.fixture(scope="session")
def fixture_build_config(fixture_api_dir):
    from patpairs.builder import BuildConfig
    from patpairs.gpatents import PageClientConfig
    from patpairs.uspto import ClientConfig

    def make(seed_query="redox flow battery", **kwargs) -> "BuildConfig":
        return BuildConfig(
            seed_query=seed_query,
            bulk=ClientConfig(mode="FIXTURE", fixture_dir=fixture_api_dir),
            office_actions=ClientConfig(mode="FIXTURE", fixture_dir=fixture_api_dir),
            pages=PageClientConfig(mode="FIXTURE", fixture_dir=fixture_api_dir),
            **kwargs,
        )

    return make
