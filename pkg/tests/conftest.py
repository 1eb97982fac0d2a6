import os

import pytest

from nrpdcch.core_model import (
    BandwidthPart,
    CellConfig,
    CoresetConfig,
    Numerology,
)
from nrpdcch.search_space import SearchSpaceSet

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


def make_coreset(num_groups=9, duration=2, mapping="interleaved", bundle_size=2,
                 rows=2, shift=0, index=1, bwp=0, granularity="narrowband"):
    return CoresetConfig(
        index=index,
        bwp_index=bwp,
        freq_resource=(1 << num_groups) - 1,
        duration_symbols=duration,
        mapping=mapping,
        bundle_size=bundle_size,
        interleaver_rows=rows,
        shift=shift,
        precoder_granularity=granularity,
    )


@pytest.fixture
def coreset_54x2():
    # 54 PRBs, 2 symbols, bundle size 2, two interleaver rows: 108 REGs,
    # 54 bundles, 18 CCEs.
    return make_coreset()


def make_cell(coresets=(), search_spaces=(), bwps=None, **kw):
    if bwps is None:
        bwps = (BandwidthPart(0, 0, 106, Numerology(1)),)
    return CellConfig(
        phys_cell_id=kw.pop("phys_cell_id", 42),
        bwps=tuple(bwps),
        coresets=tuple(coresets),
        search_spaces=tuple(search_spaces),
        **kw,
    )


def make_ss(index=2, ss_type="uss", coreset=1, periodicity=1, offset=0, duration=1,
            symbols=(0,), candidates=None, formats=("1_1",)):
    return SearchSpaceSet(
        index=index,
        ss_type=ss_type,
        coreset_index=coreset,
        periodicity=periodicity,
        offset=offset,
        duration=duration,
        symbol_bitmap=sum(1 << s for s in symbols),
        candidates=dict(candidates or {}),
        monitored_formats=tuple(formats),
    )


@pytest.fixture
def example_cell_path():
    return os.path.join(CONFIG_DIR, "example_cell.yaml")


@pytest.fixture
def example_scenario_path():
    return os.path.join(CONFIG_DIR, "example_scenario.yaml")
