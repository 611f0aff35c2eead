from functools import wraps

import pandas as pd

from .logging import get_logger

logger = get_logger(__name__)


def df(func):
    """
    Convert a list-of-records result into a DataFrame.

    The wrapped function gains a keyword-only ``df`` switch. With ``df=True``
    (the default) the returned list of dicts becomes a ``pandas.DataFrame``
    whose columns follow the key order of the first record; with
    ``df=False`` the records are returned untouched.

    Returns:
        function: The wrapped function.

    Examples:
        ```python
        rank_relation_report(z_blocks, s_blocks)            # DataFrame
        rank_relation_report(z_blocks, s_blocks, df=False)  # list[dict]
        ```
    """

    @wraps(func)
    def _wrapper(*args, **kwargs):
        as_frame = kwargs.pop("df", True)
        result = func(*args, **kwargs)

        if result is None or not as_frame:
            return result
        return records_to_df(result)

    return _wrapper


def records_to_df(records) -> pd.DataFrame:
    """
    Build a DataFrame from a record or a list of records.

    Args:
        records (dict | list[dict]): One record or a list of records.

    Returns:
        pd.DataFrame: One row per record. An empty list gives an empty frame.

    Raises:
        TypeError: If the input is not a dict or a list of dicts.
    """
    if isinstance(records, dict):
        return pd.DataFrame([records])

    if isinstance(records, list):
        if not records:
            return pd.DataFrame()
        if all(isinstance(item, dict) for item in records):
            return pd.DataFrame(records, columns=list(records[0].keys()))
        raise TypeError("The list contains items that are not dictionaries.")

    raise TypeError(
        "Input type must be a dictionary or a list of dictionaries."
    )
