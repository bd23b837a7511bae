import pytest

from metroflow.stations import classify_stations, station_stats
from metroflow.synth import SyntheticConfig, generate_synthetic


@pytest.fixture(scope="session")
def small_dataset():
    """8 stations x 30 days with a planted barometer effect and noise."""
    config = SyntheticConfig(
        seed=7, n_stations=8, n_days=30, class_counts=(2, 2, 2, 2),
        noise_scale=5.0, workday_effects=(0.0, 0.0, 0.0, -60.0),
        weekend_effects=(0.0, 0.0, 0.0, -60.0),
        weather_steps=(0.6, 3.0, 2.5, 12.0),
    )
    dataset, truth = generate_synthetic(config)
    return dataset, truth


@pytest.fixture(scope="session")
def small_classes(small_dataset):
    dataset, _ = small_dataset
    return classify_stations(station_stats(dataset))
