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
import abc
from typing import Generic, Callable, Union, Any, TypeVar, Tuple, List, Optional

In = TypeVar("In")
Out = TypeVar("Out")
Receiver = TypeVar("Receiver")
CallbackCall = Callable[[In], Out]
CallbackDrop = Callable[[], None]

class IClosure(Generic[In, Out]):
    """
    A Closure is a pair of a ``call`` function that will be used as a callback,
    and a ``drop`` function that will be called once no more values will be produced.
    """
    @property
    @abc.abstractmethod
    def call(self) -> Callable[[In], Out]:
        ...
    @property
    @abc.abstractmethod
    def drop(self) -> Callable[[], None]:
        ...

class IHandler(Generic[In, Out, Receiver]):
    """
    A Handler is a value that may be converted into a callback closure on one side (the simulation pushes
    diagnostics or log records through it), while possibly providing a receiver for that data on the other side.
    """
    @property
    @abc.abstractmethod
    def closure(self) -> IClosure[In, Out]:
        ...
    @property
    @abc.abstractmethod
    def receiver(self) -> Receiver:
        ...

IntoClosure = Union[IHandler[In, Out, Any], IClosure[In, Out], Tuple[CallbackCall, CallbackDrop], CallbackCall]
class Closure(IClosure, Generic[In, Out]):
    """
    Normalizes anything callback-like into a ``call``/``drop`` pair.
    """
    def __init__(self, closure: IntoClosure[In, Out], type_adaptor: Callable[[Any], In] = None):
        _call_ = None
        _drop_ = lambda: None
        if isinstance(closure, IHandler):
            closure = closure.closure
            # dev-note: do not elif here, the next if will catch the obtained closure.
        if isinstance(closure, IClosure):
            _call_ = closure.call
            _drop_ = closure.drop
        elif isinstance(closure, tuple):
            _call_, _drop_ = closure
        elif callable(closure):
            _call_ = closure
        else:
            raise TypeError("Unexpected type as input for cavitycluster.Closure")
        if type_adaptor is not None:
            self._call_ = lambda *args: _call_(type_adaptor(*args))
        else:
            self._call_ = _call_
        self._drop_ = _drop_

    @property
    def call(self) -> Callable[[In], Out]:
        return self._call_

    @property
    def drop(self) -> Callable[[], None]:
        return self._drop_

IntoHandler = Union[IHandler[In, Out, Receiver], IClosure[In, Out], Tuple[CallbackCall, CallbackDrop, Receiver], Tuple[CallbackCall, CallbackDrop], CallbackCall, None]
class Handler(IHandler, Generic[In, Out, Receiver]):
    """
    Wraps an ``IntoHandler``. ``None`` becomes a handler that discards everything.
    """
    def __init__(self, input: IntoHandler[In, Out, Receiver], type_adaptor: Callable[[Any], In] = None):
        self._receiver_ = None
        if input is None:
            closure = (lambda x: None, lambda: None)
        elif isinstance(input, IHandler):
            self._receiver_ = input.receiver
            closure = input.closure
        elif isinstance(input, tuple) and len(input) == 3:
            call, drop, self._receiver_ = input
            closure = (call, drop)
        else:
            closure = input
        self._closure_ = Closure(closure, type_adaptor)

    @property
    def closure(self) -> IClosure[In, Out]:
        return self._closure_
    @property
    def receiver(self) -> Optional[Receiver]:
        return self._receiver_

    def __call__(self, value: In):
        return self._closure_.call(value)

    def close(self):
        self._closure_.drop()

class ListCollector(IHandler[In, None, Callable[[], List[In]]], Generic[In]):
    """
    A simple collector that aggregates values into a list.

    When used as a handler, it provides a callback that appends elements to a list,
    and a receiver function returning said list.
    """
    def __init__(self):
        self._vec_ = []
        self._done_ = False

    @property
    def closure(self):
        def call(x):
            self._vec_.append(x)
        def drop():
            self._done_ = True
        return Closure((call, drop))

    @property
    def receiver(self):
        return lambda: self._vec_

    @property
    def done(self) -> bool:
        "Whether the producer signaled it will not push more values."
        return self._done_
