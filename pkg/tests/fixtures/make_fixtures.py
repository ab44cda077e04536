#!/usr/bin/env python3
"""Generate the manifest fixtures used by the test suite.

Writes trainticket.json (a 41-service booking system with a realistic call
topology) and minisys.json (a small six-service system with shared controller
groups, a bidirectional edge, and a known highlightable path). Deliberately
free of engine imports so the fixtures stay an independent input.
"""

import argparse
import json
from pathlib import Path

TRAINTICKET_SERVICES = [
    "ts-admin-basic-info-service",
    "ts-admin-order-service",
    "ts-admin-route-service",
    "ts-admin-travel-service",
    "ts-admin-user-service",
    "ts-assurance-service",
    "ts-auth-service",
    "ts-basic-service",
    "ts-cancel-service",
    "ts-config-service",
    "ts-consign-price-service",
    "ts-consign-service",
    "ts-contacts-service",
    "ts-delivery-service",
    "ts-execute-service",
    "ts-food-map-service",
    "ts-food-service",
    "ts-inside-payment-service",
    "ts-news-service",
    "ts-notification-service",
    "ts-order-other-service",
    "ts-order-service",
    "ts-payment-service",
    "ts-preserve-other-service",
    "ts-preserve-service",
    "ts-price-service",
    "ts-rebook-service",
    "ts-route-plan-service",
    "ts-route-service",
    "ts-seat-service",
    "ts-security-service",
    "ts-station-food-service",
    "ts-station-service",
    "ts-ticketinfo-service",
    "ts-train-service",
    "ts-travel-plan-service",
    "ts-travel-service",
    "ts-travel2-service",
    "ts-ui-dashboard",
    "ts-user-service",
    "ts-verification-code-service",
]

# Directed caller -> callees table; each entry becomes one call from the
# caller's dispatch endpoint to the callee's info endpoint.
TRAINTICKET_CALLS = {
    "ts-ui-dashboard": [
        "ts-auth-service",
        "ts-travel-service",
        "ts-travel-plan-service",
        "ts-order-service",
        "ts-user-service",
        "ts-news-service",
    ],
    "ts-auth-service": ["ts-verification-code-service", "ts-user-service"],
    "ts-user-service": ["ts-auth-service"],
    "ts-preserve-service": [
        "ts-basic-service",
        "ts-seat-service",
        "ts-security-service",
        "ts-order-service",
        "ts-contacts-service",
        "ts-user-service",
        "ts-assurance-service",
        "ts-food-service",
        "ts-consign-service",
        "ts-notification-service",
        "ts-ticketinfo-service",
    ],
    "ts-preserve-other-service": [
        "ts-basic-service",
        "ts-seat-service",
        "ts-security-service",
        "ts-order-other-service",
        "ts-contacts-service",
        "ts-user-service",
    ],
    "ts-basic-service": [
        "ts-station-service",
        "ts-train-service",
        "ts-route-service",
        "ts-price-service",
    ],
    "ts-ticketinfo-service": ["ts-basic-service"],
    "ts-travel-service": [
        "ts-ticketinfo-service",
        "ts-order-service",
        "ts-train-service",
        "ts-route-service",
        "ts-seat-service",
    ],
    "ts-travel2-service": [
        "ts-ticketinfo-service",
        "ts-order-other-service",
        "ts-train-service",
        "ts-route-service",
        "ts-seat-service",
    ],
    "ts-travel-plan-service": [
        "ts-travel-service",
        "ts-travel2-service",
        "ts-route-plan-service",
        "ts-seat-service",
    ],
    "ts-route-plan-service": [
        "ts-route-service",
        "ts-travel-service",
        "ts-travel2-service",
    ],
    "ts-order-service": ["ts-station-service"],
    "ts-order-other-service": ["ts-station-service"],
    "ts-seat-service": ["ts-order-service", "ts-order-other-service", "ts-config-service"],
    "ts-security-service": ["ts-order-service", "ts-order-other-service"],
    "ts-execute-service": ["ts-order-service", "ts-order-other-service"],
    "ts-cancel-service": [
        "ts-order-service",
        "ts-order-other-service",
        "ts-inside-payment-service",
        "ts-notification-service",
        "ts-user-service",
    ],
    "ts-rebook-service": [
        "ts-order-service",
        "ts-travel-service",
        "ts-inside-payment-service",
        "ts-seat-service",
    ],
    "ts-inside-payment-service": ["ts-payment-service", "ts-order-service"],
    "ts-food-service": [
        "ts-food-map-service",
        "ts-travel-service",
        "ts-station-food-service",
    ],
    "ts-station-food-service": ["ts-station-service"],
    "ts-consign-service": ["ts-consign-price-service", "ts-order-service"],
    "ts-delivery-service": ["ts-food-service"],
    "ts-admin-basic-info-service": [
        "ts-station-service",
        "ts-train-service",
        "ts-config-service",
        "ts-price-service",
        "ts-contacts-service",
    ],
    "ts-admin-order-service": ["ts-order-service", "ts-order-other-service"],
    "ts-admin-route-service": ["ts-route-service", "ts-station-service"],
    "ts-admin-travel-service": [
        "ts-travel-service",
        "ts-travel2-service",
        "ts-train-service",
        "ts-route-service",
    ],
    "ts-admin-user-service": ["ts-user-service"],
}

# Extra endpoint-level calls that push specific service pairs past one
# distinct dependency: (caller, caller ep, callee, callee ep).
TRAINTICKET_EXTRA = [
    ("ts-travel-service", ("GET", "query-orders"), "ts-order-service", ("GET", "list")),
    ("ts-travel-service", ("GET", "refresh"), "ts-order-service", ("POST", "create")),
    ("ts-travel-service", ("GET", "refresh"), "ts-order-service", ("PUT", "update")),
    ("ts-ui-dashboard", ("GET", "travel-page"), "ts-travel-service", ("GET", "schedule")),
    ("ts-basic-service", ("GET", "names"), "ts-station-service", ("POST", "query")),
    ("ts-basic-service", ("GET", "resolve"), "ts-station-service", ("GET", "by-id")),
    # Self call: node metadata, never an edge.
    ("ts-user-service", ("POST", "sync"), "ts-user-service", ("GET", "info")),
]


def short_name(service):
    name = service
    if name.startswith("ts-"):
        name = name[3:]
    if name.endswith("-service"):
        name = name[: -len("-service")]
    return name


def base_route(service):
    return f"/api/v1/{short_name(service)}"


def build_trainticket():
    services = {}
    for name in TRAINTICKET_SERVICES:
        route = base_route(name)
        services[name] = {
            "name": name,
            "base_route": route,
            "endpoints": [{"method": "GET", "path": f"{route}/info", "calls": []}],
        }

    def endpoint(service, method, suffix):
        route = base_route(service)
        path = f"{route}/{suffix}"
        for ep in services[service]["endpoints"]:
            if ep["method"] == method and ep["path"] == path:
                return ep
        ep = {"method": method, "path": path, "calls": []}
        services[service]["endpoints"].append(ep)
        return ep

    for caller, callees in TRAINTICKET_CALLS.items():
        dispatch = endpoint(caller, "POST", "dispatch")
        for callee in callees:
            dispatch["calls"].append(
                {"service": callee, "endpoint": f"GET {base_route(callee)}/info"}
            )

    for caller, (c_method, c_suffix), callee, (t_method, t_suffix) in TRAINTICKET_EXTRA:
        target = endpoint(callee, t_method, t_suffix)
        source = endpoint(caller, c_method, c_suffix)
        source["calls"].append(
            {"service": callee, "endpoint": f"{t_method} {target['path']}"}
        )

    preserve = services["ts-preserve-service"]
    preserve["functions"] = ["preserve", "checkUser", "createOrder", "notify"]
    for ep in preserve["endpoints"]:
        if ep["method"] == "POST" and ep["path"].endswith("/dispatch"):
            ep["flow"] = [
                {"function": "preserve", "seq": 1, "calls": ["checkUser"]},
                {"function": "checkUser", "seq": 2, "calls": ["createOrder"]},
                {"function": "createOrder", "seq": 3, "calls": ["notify"]},
                {"function": "notify", "seq": 4, "calls": []},
            ]

    return {
        "system_name": "Train Ticket Booking",
        "services": [services[name] for name in TRAINTICKET_SERVICES],
    }


def build_minisys():
    def svc(name, route, endpoints, functions=None):
        doc = {"name": name, "base_route": route, "endpoints": endpoints}
        if functions:
            doc["functions"] = functions
        return doc

    return {
        "system_name": "Minisys",
        "services": [
            svc(
                "s1",
                "/api/v1/s1",
                [
                    {"method": "GET", "path": "/api/v1/s1/info", "calls": []},
                    {
                        "method": "POST",
                        "path": "/api/v1/s1/process",
                        "calls": [
                            {"service": "s4", "endpoint": "GET /api/shared-b/s4/info"},
                            {"service": "s6", "endpoint": "GET /api/shared-b/s6/info"},
                        ],
                        "flow": [
                            {"function": "handle", "seq": 1, "calls": ["resolve"]},
                            {"function": "resolve", "seq": 2, "calls": ["emit"]},
                            {"function": "emit", "seq": 3, "calls": []},
                        ],
                    },
                ],
                functions=["handle", "resolve", "emit"],
            ),
            svc(
                "s2",
                "/api/v1/s2",
                [
                    {"method": "GET", "path": "/api/v1/s2/info", "calls": []},
                    {
                        "method": "POST",
                        "path": "/api/v1/s2/submit",
                        "calls": [
                            {"service": "s1", "endpoint": "GET /api/v1/s1/info"},
                            {"service": "s4", "endpoint": "GET /api/shared-b/s4/info"},
                        ],
                    },
                ],
            ),
            svc(
                "s3",
                "/api/shared-a",
                [
                    {"method": "GET", "path": "/api/shared-a/s3/info", "calls": []},
                    {
                        "method": "POST",
                        "path": "/api/shared-a/s3/push",
                        "calls": [{"service": "s5", "endpoint": "GET /api/shared-a/s5/info"}],
                    },
                ],
            ),
            svc(
                "s4",
                "/api/shared-b",
                [
                    {"method": "GET", "path": "/api/shared-b/s4/info", "calls": []},
                    {
                        "method": "POST",
                        "path": "/api/shared-b/s4/relay",
                        "calls": [{"service": "s6", "endpoint": "GET /api/shared-b/s6/info"}],
                    },
                ],
            ),
            svc(
                "s5",
                "/api/shared-a",
                [
                    {"method": "GET", "path": "/api/shared-a/s5/info", "calls": []},
                    {
                        "method": "POST",
                        "path": "/api/shared-a/s5/reply",
                        "calls": [{"service": "s3", "endpoint": "GET /api/shared-a/s3/info"}],
                    },
                ],
            ),
            svc(
                "s6",
                "/api/shared-b",
                [
                    {"method": "GET", "path": "/api/shared-b/s6/info", "calls": []},
                    {
                        "method": "POST",
                        "path": "/api/shared-b/s6/fanout",
                        "calls": [{"service": "s3", "endpoint": "GET /api/shared-a/s3/info"}],
                    },
                ],
            ),
        ],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out-dir", default=str(Path(__file__).parent), help="output directory"
    )
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    trainticket = build_trainticket()
    assert len(trainticket["services"]) == 41
    (out / "trainticket.json").write_text(json.dumps(trainticket, indent=2) + "\n")

    minisys = build_minisys()
    (out / "minisys.json").write_text(json.dumps(minisys, indent=2) + "\n")

    print(f"wrote {out / 'trainticket.json'} ({len(trainticket['services'])} services)")
    print(f"wrote {out / 'minisys.json'} ({len(minisys['services'])} services)")


if __name__ == "__main__":
    main()
