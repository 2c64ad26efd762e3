"""Test package."""