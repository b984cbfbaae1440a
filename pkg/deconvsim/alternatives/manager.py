"""Resolves alternative estimators by name."""

from deconvsim.alternatives.base import AlternativeEstimator


def get_alternative(name: str, settings=None) -> AlternativeEstimator:
    """
    Instantiates the alternative estimator class called `name`.
    Args:
        name (str): class name of a registered AlternativeEstimator subclass.
        settings (ConfigParser, optional): passed to the constructor.
    Returns:
        AlternativeEstimator: a fresh instance.
    Raises:
        ValueError: If no registered subclass has that name.
    """

    available = {cls.__name__: cls for cls in AlternativeEstimator.__subclasses__()}

    if name not in available:
        raise ValueError(
            f"Alternative '{name}' is not among the available estimators: "
            f"{sorted(available)}"
        )

    return available[name](settings)
