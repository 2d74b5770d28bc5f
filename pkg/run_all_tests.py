#!/usr/bin/env python3
"""
Master test runner for cartankit

Run all tests: python run_all_tests.py
Run unit tests: python run_all_tests.py unit
Run integration tests: python run_all_tests.py integration
Skip μ-cloud sampling: python run_all_tests.py fast
"""

import os
import subprocess
import sys

MARKERS = {
    "unit": "unit",
    "integration": "integration",
    "slow": "slow",
    "fast": "not slow",
}


def check_environment():
    """Report CARTANKIT_* overrides; none are required"""
    overrides = sorted(k for k in os.environ if k.startswith("CARTANKIT_"))
    if overrides:
        print(f"⚠️  Environment overrides active: {', '.join(overrides)}")
        print("   Sampling defaults may differ from the test expectations")
    else:
        print("✅ No CARTANKIT_* overrides")


def run_tests(marker=None):
    """Run pytest with optional marker expression"""
    cmd = [sys.executable, '-m', 'pytest', 'tests/', '-v']

    if marker:
        cmd.extend(['-m', marker])

    print(f"🧪 Running: {' '.join(cmd)}")
    print("=" * 60)

    result = subprocess.run(cmd)

    return result.returncode == 0


def main():
    """Main test runner"""
    print("🚀 cartankit Test Suite")
    print("=" * 60)

    check_environment()

    if len(sys.argv) > 1:
        choice = sys.argv[1]
        if choice not in MARKERS:
            print(f"❌ Invalid marker: {choice}")
            print(f"   Use one of {', '.join(MARKERS)}, or no argument for all tests")
            sys.exit(1)
        marker = MARKERS[choice]
    else:
        marker = None

    success = run_tests(marker)

    if success:
        print("\n✅ All tests passed!")
    else:
        print("\n❌ Some tests failed")
        sys.exit(1)


if __name__ == "__main__":
    main()
