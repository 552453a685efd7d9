from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from . import __version__
from .api.v1 import convolution as convolution_routes
from .api.v1 import reshape as reshape_routes
from .api.v1 import resources as resources_routes
from .core.config import get_settings
from .core.logging import configure_logging

settings = get_settings()
configure_logging()

app = FastAPI(
    title="QConv Simulator API",
    description="Simulated quantum convolution: kernel reshaping, overlap estimation and resource reports",
    version=__version__,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.allowed_origins_list(),
    allow_credentials=False,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(convolution_routes.router)
app.include_router(reshape_routes.router)
app.include_router(resources_routes.router)


@app.get("/healthz")
def healthz():
    return {"ok": True}
