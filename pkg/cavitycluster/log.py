#
# Copyright (c) 2024 The cavity-cluster contributors
#
# This program and the accompanying materials are made available under the
# terms of the Eclipse Public License 2.0 which is available at
# http://www.eclipse.org/legal/epl-2.0, or the Apache License, Version 2.0
# which is available at https://www.apache.org/licenses/LICENSE-2.0.
#
# SPDX-License-Identifier: EPL-2.0 OR Apache-2.0
#
import logging
import os
from typing import Optional

LOG_ENV = "CAVITYCLUSTER_LOG"

_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "warning": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
    "trace": logging.DEBUG,
}

def init_logger(level: Optional[str] = None):
    """
    Starts logging for the ``cavitycluster`` loggers.

    The level is read from ``level``, then from the ``CAVITYCLUSTER_LOG`` environment variable,
    and defaults to ``warn``. Calling it again only changes the level.

    :Example:

    >>> import cavitycluster
    >>> cavitycluster.init_logger("debug")
    """
    name = (level or os.environ.get(LOG_ENV) or "warn").lower()
    if name not in _LEVELS:
        raise ValueError(f"unknown log level {name!r}, expected one of {sorted(_LEVELS)}")
    root = logging.getLogger("cavitycluster")
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("[%(asctime)s %(levelname)s %(name)s] %(message)s"))
        root.addHandler(handler)
    root.setLevel(_LEVELS[name])
    return root
