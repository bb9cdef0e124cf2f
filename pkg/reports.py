"""
Verification report.

Re-runs every check in the package, writes a timestamped markdown report and a
few figures, and collects the places where a recomputed value disagrees with
the hand-derived one.
"""

import os
import json
import logging
import random
import argparse
from datetime import datetime

import matplotlib.pyplot as plt
import numpy as np

from curvature import FOUR_PI, load_complex, platonic_complexes, random_spherical_complex, total_curvature
from ledger import VERIFIED, check_file, shipped_ledgers
from oracle import CLASSIFICATION_CASES, DEFAULT_MAX_COSETS, format_abelian, verify_fibonacci_orders
from presentations import FAMILIES, tietze_script_for, verify_tietze_script
from regions import LISTED_LABELING_TOTAL, classify_regions, compare_with_listed, labeling_census
from stargraph import CLASSICAL_LABELS, compare_with_classical, enumerate_vertex_labels, format_label

logger = logging.getLogger(__name__)

COMPLEX_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "complexes")


class VerificationReport:
    """Run every module's checks and write the results up"""

    def __init__(self, output_dir="verification_results", nmin=7, max_cosets=DEFAULT_MAX_COSETS,
                 strategy="hlt", progress=False):
        self.output_dir = output_dir
        self.nmin = nmin
        self.max_cosets = max_cosets
        self.strategy = strategy
        self.progress = progress
        self.results = {}
        self.findings = []

        # Ensure output directory exists
        if not os.path.exists(output_dir):
            os.makedirs(output_dir)

    def add_finding(self, module, subject, text):
        self.findings.append({"module": module, "subject": subject, "text": text})
        logger.info(f"[Report] finding in {module}: {subject}")

    def check_tietze(self, ks=(0, 1, 2, 3)):
        """Replay the shipped reduction scripts for both families"""
        rows = []
        for family in sorted(FAMILIES):
            for k in ks:
                script = tietze_script_for(family, k)
                verdict = verify_tietze_script(script.start, script, script.target)
                rows.append({"family": family, "k": k, "N": FAMILIES[family][0] + 5 * k,
                             "steps": len(script.steps), "verdict": str(verdict)})
                if not verdict.valid:
                    self.add_finding("presentations", f"{family} k={k}", str(verdict))
        self.results["tietze"] = rows
        return rows

    def check_orders(self, cases=None):
        """Coset enumeration against the order classification"""
        cases = CLASSIFICATION_CASES if cases is None else cases
        reports = verify_fibonacci_orders(cases, max_cosets=self.max_cosets,
                                          strategy=self.strategy, progress=self.progress)
        for rep in reports:
            if rep.status != "pass":
                self.add_finding("oracle", f"F({rep.r},{rep.n})",
                                 f"{rep.status}: expected {rep.expected}, got {rep.got}")
        self.results["orders"] = [rep.as_dict() for rep in reports]
        return reports

    def check_labels(self, max_degree=7):
        """Vertex label counts by degree, compared with the classical lists"""
        counts = {}
        for d in range(2, max_degree + 1):
            labels = enumerate_vertex_labels(d, progress=self.progress)
            counts[d] = len(labels)
            if d in CLASSICAL_LABELS:
                missing, extra = compare_with_classical(d, labels)
                for text in missing:
                    self.add_finding("stargraph", f"degree {d}", f"listed label {text} is not admissible")
                for text in extra:
                    self.add_finding("stargraph", f"degree {d}", f"admissible label {text} is not listed")
        self.results["labels"] = counts
        return counts

    def check_curvature(self, samples=100, seed=0):
        """Euler identity on the platonic solids, shipped complexes and random subdivisions"""
        rows = []
        for name, complex_ in sorted(platonic_complexes().items()):
            rows.append({"complex": name, "total": str(total_curvature(complex_))})
        if os.path.isdir(COMPLEX_DIR):
            for filename in sorted(os.listdir(COMPLEX_DIR)):
                if not filename.endswith(".json"):
                    continue
                try:
                    total = str(total_curvature(load_complex(os.path.join(COMPLEX_DIR, filename))))
                except ValueError as e:
                    total = f"rejected ({str(e)})"
                rows.append({"complex": filename, "total": total})
        rng = random.Random(seed)
        random_ok = sum(total_curvature(random_spherical_complex(rng, steps=rng.randint(0, 30))) == FOUR_PI
                        for _ in range(samples))
        if random_ok != samples:
            self.add_finding("curvature", "random complexes", f"{samples - random_ok} of {samples} miss 4 pi")
        self.results["curvature"] = {"complexes": rows, "random": f"{random_ok}/{samples}"}
        return self.results["curvature"]

    def check_regions(self, degrees=range(3, 10)):
        """Chord configurations surviving the length and labelling checks, then the census"""
        classifications = {m: classify_regions(m, self.nmin, progress=self.progress) for m in degrees}
        if 8 in classifications:
            missing, extra = compare_with_listed(classifications[8])
            for text in missing:
                self.add_finding("regions", f"degree 8 {text}", "listed shape is rejected by the checks")
            for text in extra:
                self.add_finding("regions", f"degree 8 {text}", "surviving shape is not listed")
        census = labeling_census(self.nmin)
        if census.total_before != LISTED_LABELING_TOTAL:
            self.add_finding("regions", "labelled regions of degree 8 and 9",
                             f"{census.total_before} labellings counted, {LISTED_LABELING_TOTAL} listed; "
                             f"{census.total_after} after merging")
        self.results["regions"] = classifications
        self.results["census"] = census
        return classifications

    def check_ledgers(self, paths=None):
        """Re-evaluate every shipped ledger"""
        paths = shipped_ledgers() if paths is None else paths
        reports = []
        for path in paths:
            report = check_file(path, progress=self.progress)
            reports.append(report)
            name = os.path.basename(path)
            for v in report.verdicts:
                if v.status != VERIFIED:
                    self.add_finding("ledger", f"{name} {v.entry_id}", f"{v.status}: {v.value} {v.reason}".strip())
                if v.finding:
                    self.add_finding("ledger", f"{name} {v.entry_id}", v.finding)
        self.results["ledgers"] = reports
        return reports

    def generate_report(self):
        """Write the markdown report and return its path"""
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        report_file = os.path.join(self.output_dir, f"verification_report_{timestamp}.md")

        with open(report_file, 'w', encoding='utf-8') as f:
            f.write("# Verification Report\n\n")
            f.write(f"Generated on: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n\n")
            f.write(f"- n >= {self.nmin}, coset budget {self.max_cosets}, strategy {self.strategy}\n")
            f.write(f"- Findings: {len(self.findings)}\n")

            if "tietze" in self.results:
                f.write("\n## Tietze Reductions\n\n")
                f.write("| Family | k | N | Steps | Verdict |\n")
                f.write("|--------|---|---|-------|---------|\n")
                for row in self.results["tietze"]:
                    f.write(f"| {row['family']} | {row['k']} | {row['N']} | {row['steps']} | {row['verdict']} |\n")

            if "orders" in self.results:
                f.write("\n## Fibonacci Group Orders\n\n")
                f.write("| F(r,n) | Expected | Got | Abelianization | Cosets | Status |\n")
                f.write("|--------|----------|-----|----------------|--------|--------|\n")
                for row in self.results["orders"]:
                    ab = format_abelian(row["abelianization"])
                    f.write(f"| F({row['r']},{row['n']}) | {row['expected']} | {row['got']} | {ab} | "
                            f"{row['cosets_defined']} | {row['status']} |\n")

            if "labels" in self.results:
                f.write("\n## Vertex Labels\n\n")
                f.write("| Degree | Admissible labels |\n")
                f.write("|--------|-------------------|\n")
                for d, count in self.results["labels"].items():
                    f.write(f"| {d} | {count} |\n")

            if "curvature" in self.results:
                f.write("\n## Euler Identity\n\n")
                for row in self.results["curvature"]["complexes"]:
                    f.write(f"- {row['complex']}: {row['total']}\n")
                f.write(f"- random subdivisions with total 4 pi: {self.results['curvature']['random']}\n")

            if "regions" in self.results:
                f.write("\n## Region Classification\n\n")
                f.write("| Degree | Survivors | LEC | LAC |\n")
                f.write("|--------|-----------|-----|-----|\n")
                for m, report in self.results["regions"].items():
                    f.write(f"| {m} | {len(report.survivors)} | {len(report.lec_killed)} | "
                            f"{len(report.lac_killed)} |\n")
                for m, report in self.results["regions"].items():
                    for config, result in report.survivors:
                        lengths = ", ".join(f"{c} = {e}" for c, e in result.length_text().items())
                        f.write(f"- degree {m} {config}: {lengths or 'no chords'} ({result.n_condition})\n")

            if "census" in self.results:
                census = self.results["census"]
                f.write("\n### Labelled Regions of Degree 8 and 9\n\n")
                for shape, count in census.counts().items():
                    f.write(f"- {shape}: {count}\n")
                f.write(f"\n{census.total_before} labellings, {census.total_after} distinct corner words, "
                        f"{len(census.flip_classes)} up to the flip.\n\n")
                for label in census.classes:
                    f.write(f"- `{format_label(label)}`\n")

            if "ledgers" in self.results:
                f.write("\n## Ledgers\n\n")
                f.write("| Ledger | Verified | Refuted | Malformed |\n")
                f.write("|--------|----------|---------|-----------|\n")
                for report in self.results["ledgers"]:
                    f.write(f"| {os.path.basename(report.path)} | {report.verified} | {report.refuted} | "
                            f"{report.malformed} |\n")

            f.write("\n## Findings\n\n")
            if not self.findings:
                f.write("No discrepancies.\n")
            for finding in self.findings:
                f.write(f"- **{finding['module']}** {finding['subject']}: {finding['text']}\n")

        print(f"\nReport generated: {report_file}")
        return report_file

    def generate_visualizations(self):
        """Chord diagrams, label counts and ledger margins"""
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        saved = []

        try:
            # Create a subfolder for visualizations
            viz_dir = os.path.join(self.output_dir, "visualizations")
            if not os.path.exists(viz_dir):
                os.makedirs(viz_dir)

            # 1. Chord diagrams of the surviving regions
            survivors = [(m, config) for m, report in self.results.get("regions", {}).items()
                         for config, _ in report.survivors]
            if survivors:
                cols = min(4, len(survivors))
                rows = (len(survivors) + cols - 1) // cols
                fig, axes = plt.subplots(rows, cols, figsize=(3 * cols, 3 * rows), squeeze=False)
                for ax in axes.flat:
                    ax.axis('off')
                for ax, (m, config) in zip(axes.flat, survivors):
                    angles = np.pi / 2 - 2 * np.pi * np.arange(m) / m
                    xs, ys = np.cos(angles), np.sin(angles)
                    ax.fill(xs, ys, facecolor='#eef3fb', edgecolor='black')
                    for p, q in config.chords:
                        ax.plot([xs[p - 1], xs[q - 1]], [ys[p - 1], ys[q - 1]], color='tab:red')
                    for v in range(m):
                        ax.annotate(str(v + 1), (1.15 * xs[v], 1.15 * ys[v]), ha='center', va='center',
                                    fontsize=8)
                    ax.set_title(f"{m}: {config}", fontsize=8)
                    ax.set_aspect('equal')
                    ax.set_xlim(-1.3, 1.3)
                    ax.set_ylim(-1.3, 1.3)
                plt.tight_layout()
                path = os.path.join(viz_dir, f"region_survivors_{timestamp}.png")
                plt.savefig(path)
                plt.close()
                saved.append(path)

            # 2. Vertex labels per degree
            if self.results.get("labels"):
                plt.figure(figsize=(8, 5))
                degrees = list(self.results["labels"].keys())
                counts = list(self.results["labels"].values())
                plt.bar(degrees, counts)
                plt.title('Admissible Vertex Labels by Degree')
                plt.xlabel('Degree')
                plt.ylabel('Number of Labels')
                plt.xticks(degrees)
                plt.tight_layout()
                path = os.path.join(viz_dir, f"label_counts_{timestamp}.png")
                plt.savefig(path)
                plt.close()
                saved.append(path)

            # 3. Ledger margins
            margins = [float(v.margin) for report in self.results.get("ledgers", [])
                       for v in report.verdicts if v.margin is not None]
            if margins:
                plt.figure(figsize=(10, 6))
                plt.hist(margins, bins=40)
                plt.title('Ledger Margins (claim minus recomputed value)')
                plt.xlabel('Margin (pi/30)')
                plt.ylabel('Number of Entries')
                plt.tight_layout()
                path = os.path.join(viz_dir, f"ledger_margins_{timestamp}.png")
                plt.savefig(path)
                plt.close()
                saved.append(path)

            print(f"Visualizations saved to: {viz_dir}")

        except Exception as e:
            print(f"Error generating visualizations: {str(e)}")

        return saved

    def run_all(self, cases=None, include_orders=True, max_label_degree=7, region_degrees=range(3, 10)):
        """Run every check, write the report and figures, return the findings"""
        print("Checking Tietze reductions...")
        self.check_tietze()
        if include_orders:
            print("Enumerating Fibonacci groups...")
            self.check_orders(cases)
        print("Enumerating vertex labels...")
        self.check_labels(max_label_degree)
        print("Checking the Euler identity...")
        self.check_curvature()
        print("Classifying regions...")
        self.check_regions(region_degrees)
        print("Checking ledgers...")
        self.check_ledgers()
        self.generate_report()
        self.generate_visualizations()
        print(f"{len(self.findings)} findings")
        return self.findings


def main():
    """Write a full verification report"""
    parser = argparse.ArgumentParser(description='Write a verification report for the P_n toolkit')
    parser.add_argument('--output-dir', '-o', default='verification_results',
                        help='Directory to save the report and figures')
    parser.add_argument('--skip-orders', action='store_true',
                        help='Skip the coset enumerations')
    parser.add_argument('--json', action='store_true', help='Print the findings as JSON')

    args = parser.parse_args()

    findings = VerificationReport(args.output_dir).run_all(include_orders=not args.skip_orders)
    if args.json:
        print(json.dumps(findings, indent=2))


if __name__ == "__main__":
    main()
