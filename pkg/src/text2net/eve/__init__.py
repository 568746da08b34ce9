from .client import (
    ApiError,
    AuthFailure,
    EveSession,
    MissingTemplate,
    NodeTemplate,
    PlanAborted,
    PlannedCall,
    ProvisionPlan,
    ProvisionReport,
    DEFAULT_TEMPLATES,
    execute,
    plan,
    provisioning_form,
    read_back,
    render_device_config,
)

__all__ = [
    "ApiError",
    "AuthFailure",
    "EveSession",
    "MissingTemplate",
    "NodeTemplate",
    "PlanAborted",
    "PlannedCall",
    "ProvisionPlan",
    "ProvisionReport",
    "DEFAULT_TEMPLATES",
    "execute",
    "plan",
    "provisioning_form",
    "read_back",
    "render_device_config",
]
