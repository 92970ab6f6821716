"""Small ready-made example networks.

Parameter values are plausible reconstructions chosen to exercise every
element model; they are validated against the test oracle, not against any
published data set.
"""
from __future__ import annotations

from .model import Bus, ConverterSource, ExternalGrid, Line, Network, Transformer2W

__all__ = ["three_bus_example", "wind_park_example"]


def three_bus_example() -> Network:
    """MV feed, distribution transformer and an LV feeder with a PV unit.

    Three buses: 20 kV grid connection, 0.4 kV substation busbar behind a
    630 kVA transformer, and an LV cable end bus carrying a 100 kVA
    converter unit.
    """
    return Network(
        name="three-bus-example",
        buses=[
            Bus(1, 20.0, "MV connection"),
            Bus(2, 0.4, "LV busbar"),
            Bus(3, 0.4, "LV feeder end"),
        ],
        external_grids=[
            ExternalGrid(bus=1, s_sc_max_mva=100.0, s_sc_min_mva=80.0, rx_max=0.1, rx_min=0.1),
        ],
        transformers2w=[
            Transformer2W(
                hv_bus=1,
                lv_bus=2,
                sn_mva=0.63,
                vn_hv_kv=20.0,
                vn_lv_kv=0.4,
                vk_percent=6.0,
                vkr_percent=1.1,
            ),
        ],
        lines=[
            Line(
                from_bus=2,
                to_bus=3,
                length_km=0.2,
                r_ohm_per_km=0.21,
                x_ohm_per_km=0.08,
                endtemp_degc=90.0,
            ),
        ],
        converter_sources=[
            ConverterSource(bus=3, sn_mva=0.1, k=1.2),
        ],
    )


def wind_park_example() -> Network:
    """110 kV overhead network fed from one grid connection with three wind
    parks attached; converter ratio k = 1.2."""
    line = dict(r_ohm_per_km=0.06, x_ohm_per_km=0.4, endtemp_degc=200.0)
    return Network(
        name="wind-park-example",
        buses=[
            Bus(1, 110.0, "Grid connection"),
            Bus(2, 110.0, "Substation A"),
            Bus(3, 110.0, "Wind park I"),
            Bus(4, 110.0, "Substation B"),
            Bus(5, 110.0, "Wind park II/III"),
        ],
        external_grids=[
            ExternalGrid(bus=1, s_sc_max_mva=2000.0, s_sc_min_mva=1600.0, rx_max=0.1, rx_min=0.1),
        ],
        lines=[
            Line(from_bus=1, to_bus=2, length_km=40.0, **line),
            Line(from_bus=2, to_bus=3, length_km=25.0, **line),
            Line(from_bus=2, to_bus=4, length_km=30.0, **line),
            Line(from_bus=4, to_bus=5, length_km=15.0, **line),
        ],
        converter_sources=[
            ConverterSource(bus=3, sn_mva=50.0, k=1.2),
            ConverterSource(bus=5, sn_mva=60.0, k=1.2),
            ConverterSource(bus=5, sn_mva=40.0, k=1.2),
        ],
    )
