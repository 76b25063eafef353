# Copyright (c) 2026 setbm contributors
# 
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
# 
# The above copyright notice and this permission notice shall be included in
# all copies or substantial portions of the Software.
# 
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN
# THE SOFTWARE.

"""
Structured logging for simulations and command line runs.

A Logger carries bindings (context, command, test, …) and passes every
message as keyword arguments through a chain of consumers. Each consumer
returns the (possibly extended) message for the next one. Messages carry a
uuid naming the call site, an optional short msg and the numbers the caller
wants to see, which the JSON consumer serializes including numpy values and
reports.

>>> logger = Logger (consumer=[NullConsumer ()]).bind (context='Battery')
>>> logger.info ('test finished', uuid='c4b2…', reports=4)['context']
'Battery'
"""

import sys, json
from datetime import datetime
from collections import Counter
from enum import IntEnum

from pytz import utc

from .util import StrJsonEncoder

class Level (IntEnum):
    DEBUG = 0
    INFO = 1
    WARNING = 2
    ERROR = 3

    @classmethod
    def parse (cls, level):
        """ Level from a Level or its case-insensitive name """
        if isinstance (level, cls):
            return level
        return cls[level.upper ()]

class Logger:
    """
    Bound message emitter. logger.info (…), logger.error (…) etc. are
    shortcuts for logger (level, …).
    """

    __slots__ = ('bindings', 'consumer')

    def __init__ (self, consumer=None, bindings=None):
        self.bindings = dict (bindings or {})
        # shared with all children created by bind/unbind
        self.consumer = consumer if consumer is not None else []

    def __repr__ (self):
        return f'<Logger {self.bindings!r}>'

    def __call__ (self, level, *args, **payload):
        message = dict (self.bindings)
        message.update (payload)
        message['level'] = Level.parse (level)
        if len (args) == 1:
            message['msg'] = args[0]
        elif args:
            message['msg'] = args
        for consumer in self.consumer:
            message = consumer (**message)
        return message

    def __getattr__ (self, name):
        if name.upper () not in Level.__members__:
            raise AttributeError (name)
        level = Level[name.upper ()]
        return lambda *args, **payload: self (level, *args, **payload)

    def bind (self, **bindings):
        return type (self) (self.consumer, {**self.bindings, **bindings})

    def unbind (self, **bindings):
        return type (self) (self.consumer,
                {k: v for k, v in self.bindings.items () if k not in bindings})

    def connect (self, consumer):
        self.consumer.append (consumer)

    def disconnect (self, consumer):
        self.consumer.remove (consumer)

class Consumer:
    def __call__ (self, **message): # pragma: no cover
        raise NotImplementedError ()

class NullConsumer (Consumer):
    def __call__ (self, **message):
        return message

class JsonPrintConsumer (Consumer):
    """
    One JSON object per line for messages at or above minLevel. stderr by
    default, stdout carries the primary output of a command.
    """

    def __init__ (self, minLevel=Level.DEBUG, stream=None):
        self.minLevel = minLevel
        self.stream = stream

    def __call__ (self, **message):
        if message['level'] >= self.minLevel:
            stream = self.stream or sys.stderr
            stream.write (json.dumps (message, cls=StrJsonEncoder) + '\n')
            stream.flush ()
        return message

class DatetimeConsumer (Consumer):
    """ Timestamp in UTC """
    def __call__ (self, **message):
        message['date'] = datetime.now (utc)
        return message

class LevelCounter (Consumer):
    """ Number of messages per level, for the summary at exit """

    def __init__ (self):
        self.counts = Counter ()

    def __call__ (self, **message):
        self.counts[message['level']] += 1
        return message

    def __getitem__ (self, level):
        return self.counts[Level.parse (level)]
