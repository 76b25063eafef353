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
Serialization helpers shared by reports and log messages
"""

import json, platform, sys
from datetime import datetime
from importlib.metadata import version, PackageNotFoundError

import numpy as np

# distributions whose versions go into every report
REPORTED_PACKAGES = ('setbm', 'numpy', 'scipy', 'PyYAML')

class StrJsonEncoder (json.JSONEncoder):
    """
    Encoder for reports and log messages: numpy values become numbers and
    lists, objects with toDict () their dict, anything else its str ()
    """

    def default (self, obj):
        if isinstance (obj, np.ndarray):
            return obj.tolist ()
        elif isinstance (obj, np.generic):
            return obj.item ()
        elif isinstance (obj, datetime):
            return obj.isoformat ()
        elif hasattr (obj, 'toDict'):
            return obj.toDict ()
        return str (obj)

def formatFloat (x):
    """ Locale-independent, round-trip exact float representation """
    return format (float (x), '.17g')

def _installedVersion (name):
    try:
        return version (name)
    except PackageNotFoundError:
        return None

def getSoftwareInfo ():
    """ Interpreter, platform and library versions a report was made with """
    return {
            'platform': platform.platform (),
            'python': {
                'implementation': platform.python_implementation (),
                'version': platform.python_version (),
                'executable': sys.executable,
                },
            'packages': {name: _installedVersion (name)
                    for name in REPORTED_PACKAGES},
            }
