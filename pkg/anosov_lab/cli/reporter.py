"""
Console output of verification runs
"""

from typing import Dict


class LabReporter:
    """Prints the per-criterion summary of a verification suite"""

    @staticmethod
    def print_header(suite: str):
        print(f"=== Verification suite: {suite} ===")

    @staticmethod
    def format_name(name: str) -> str:
        return name.replace("_", " ")

    def print_summary(self, suite: str, results: Dict[str, bool]) -> bool:
        """Print one PASS/FAIL line per criterion and the totals; returns True when everything passed."""
        self.print_header(suite)
        for name, passed in results.items():
            status = "PASS" if passed else "FAIL"
            print(f"{self.format_name(name)}: {status}")

        total = len(results)
        passed_count = sum(results.values())
        print(f"\nCriteria: {total}")
        print(f"Passed: {passed_count}")
        print(f"Failed: {total - passed_count}")

        all_passed = all(results.values())
        if not all_passed:
            self._print_failures(results)
        return all_passed

    def _print_failures(self, results: Dict[str, bool]):
        failed = [name for name, passed in results.items() if not passed]
        print("\nFailed criteria:")
        for name in failed:
            print(f"  - {self.format_name(name)}")

    @staticmethod
    def print_inventory(title: str, entries: Dict[str, str]):
        print(f"{title}:")
        for name, description in entries.items():
            print(f"  - {name}: {description}" if description else f"  - {name}")
