int main() { int x = 0; switch (x) { } }
