#!/usr/bin/env python3
# Copyright 2026 The Tunescape Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Stand-in kernel executor for the command backend tests.

Reads {"parameters": {...}, "samples": n} from stdin and reports
objective_ms = 1 + sum of parameter values. The first argument selects a
misbehaviour: sleep, crash, garbage, or reject.
"""

import json
import sys
import time

mode = sys.argv[1] if len(sys.argv) > 1 else "ok"
request = json.load(sys.stdin)

if mode == "sleep":
    time.sleep(30)
elif mode == "crash":
    sys.exit(3)
elif mode == "garbage":
    print("not json")
elif mode == "reject":
    print(json.dumps({"objective_ms": None, "status": "compile_error"}))
else:
    total = 1 + sum(request["parameters"].values())
    print(json.dumps({"objective_ms": float(total), "status": "ok",
                      "samples": request["samples"]}))
