#!/usr/bin/env python3
"""
Check cartankit environment variables and the settings they resolve to

Run: python scripts/check_env.py
"""

import os

from dotenv import load_dotenv
from pydantic import ValidationError

from models.config import Settings

load_dotenv()

print("🔍 Environment Variables Check")
print("=" * 60)

env_vars = [
    "CARTANKIT_THREADS",
    "CARTANKIT_SEED",
    "CARTANKIT_BUDGET",
    "CARTANKIT_MAX_LOG_RADIUS",
    "CARTANKIT_LOG_LEVEL",
    "CARTANKIT_OUT",
]

for var in env_vars:
    value = os.getenv(var)
    if value:
        print(f"✅ {var}: {value}")
    else:
        print(f"➖ {var}: not set (default)")

print("\n" + "=" * 60)
try:
    settings = Settings()
    for name, value in settings.model_dump().items():
        print(f"   {name} = {value}")
except ValidationError as e:
    print(f"❌ Invalid settings: {e}")
